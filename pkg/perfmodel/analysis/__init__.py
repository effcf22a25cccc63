"""Operation counting, processor model, predictors and evaluation."""
