from .base import *
from .numerics import *
