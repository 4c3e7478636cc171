__version__ = "1.0.0"

from .monomials import MonomialIdeal
from .charts import BlowupTower, BlowupStep, IdealSheaf
from .equivariance import GroupAction, GroupElement, closure
from .principalizer import principalize
from .simplifier import simplify_collection
from .maps import RationalMapSpec, resolve
from .message_resolver import MessageResolver
