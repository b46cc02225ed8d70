# Model components
