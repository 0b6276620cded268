from . import utils
from ..models import User
from .helpers import x
