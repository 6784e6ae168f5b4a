# Autodiff tests package
