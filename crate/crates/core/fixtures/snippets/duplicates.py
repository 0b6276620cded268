import six
import six
from six import moves
