# Test package for tppflow