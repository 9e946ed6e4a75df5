"""
Approximation profile families.
"""

from typing import Any, Dict, List, Mapping, Type, Union

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from errors import ValidationError
from .base_profile import ApproxProfile, FRange, ProfileParams
from .families import ConstantProfile, DivisorBoundedProfile, PowerProfile
from .factorial_blocks import FactorialBlockProfile
from .table_file import TableProfile, UserFileProfile, load_table_file

__all__ = [
    "ApproxProfile",
    "FRange",
    "ProfileParams",
    "PowerProfile",
    "ConstantProfile",
    "DivisorBoundedProfile",
    "FactorialBlockProfile",
    "TableProfile",
    "UserFileProfile",
    "load_table_file",
    "get_family",
    "list_families",
    "make_profile",
]

FAMILIES: Dict[str, Type[ApproxProfile]] = {
    cls.family: cls
    for cls in (
        PowerProfile,
        ConstantProfile,
        FactorialBlockProfile,
        TableProfile,
        UserFileProfile,
        DivisorBoundedProfile,
    )
}


def list_families() -> List[str]:
    """Names of all available families."""
    return list(FAMILIES)


def get_family(name: str) -> Type[ApproxProfile]:
    """Look up a family class by tag."""
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValidationError(
            f"Unknown profile family '{name}' (available: {', '.join(FAMILIES)})",
            {"family": name},
        )


def make_profile(family: str, params: Union[Mapping[str, Any], BaseModel, None] = None) -> ApproxProfile:
    """Build a profile of the given family from a parameter mapping."""
    cls = get_family(family)
    if isinstance(params, BaseModel):
        params = params.model_dump()
    try:
        model = cls.params_model(**dict(params or {}))
    except PydanticValidationError as e:
        raise ValidationError.from_pydantic(e, f"{family} parameters")
    return cls(model)
