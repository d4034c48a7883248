from .core import *
from .curves import *
