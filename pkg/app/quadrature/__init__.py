from .core import *
from .truncation import *
