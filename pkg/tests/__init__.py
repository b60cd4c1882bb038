"""
dtilink - Unit Tests
"""
