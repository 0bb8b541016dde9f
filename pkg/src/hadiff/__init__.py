"""Higher-order differential operators on generic hyperplane arrangements."""
from .arrangement import Arrangement, check_generic, random_generic
from .exactalg import Polynomial
from .weyl import DiffOp

__all__ = ["Arrangement", "DiffOp", "Polynomial", "check_generic", "random_generic"]
__version__ = "0.1.0"
