# Core module - Graph model, similarity indices, ranking, evaluation
