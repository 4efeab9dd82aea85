from .expression import *
from .shapes import *
