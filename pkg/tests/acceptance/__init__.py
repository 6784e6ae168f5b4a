# Slow end-to-end checks
