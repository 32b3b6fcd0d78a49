# Tests package for SchurLab
