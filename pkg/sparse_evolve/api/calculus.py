from typing import Any
from fastapi import APIRouter
from sparse_evolve.engine.calculus import describe, rigid_safe_decomposition
from sparse_evolve.schemas.calculus import CalculusReport, ExtensionQuery
from sparse_evolve.utils.response import APIResponse, create_response

router = APIRouter()

@router.post("/classify", response_model=APIResponse[CalculusReport])
def classify_extension(*, query: ExtensionQuery) -> Any:
    """
    Predimension calculus for one rooted extension.

    - delta, d and the sparse/dense/safe/rigid/degenerate flags
    - rigid witness and rigid/safe split whenever they are defined
    """
    return create_response(describe(query.extension, query.alpha))

@router.post("/decompose", response_model=APIResponse[CalculusReport])
def decompose_extension(*, query: ExtensionQuery) -> Any:
    """
    Rigid/safe decomposition, failing loudly when it is undefined.

    - **422** if the extension is safe, rigid or degenerate
    """
    rigid_safe_decomposition(query.extension, query.alpha)
    return create_response(describe(query.extension, query.alpha))
