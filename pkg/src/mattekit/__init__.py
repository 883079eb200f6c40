"""Alpha-matting toolkit."""
