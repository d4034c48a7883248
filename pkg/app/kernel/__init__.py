from .core import *
from .functions import *
from .certification import *
