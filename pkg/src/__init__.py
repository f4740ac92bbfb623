"""
Kernel Toolkit - Kernel Methods for Desk-Scale Data

Kernel functions, Gram-matrix algebra, spectral embedding with out-of-sample
extension, Nystrom completion and kernel dependence statistics, exposed as a
library (`src.kernels`) and a batch CLI over CSV datasets (`src.cli`).
"""

__version__ = "0.1.0"
__author__ = "Kernel Toolkit Team"
