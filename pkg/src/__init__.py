# Two-bath bosonic thermodynamics simulation package
