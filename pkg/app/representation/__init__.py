from .core import *
from .boundary_integrals import *
from .growth import *
