from typing import Any
from fastapi import APIRouter
from sparse_evolve.engine.expectation import exact_expectation_oracle, expected_count_closed
from sparse_evolve.schemas.expectation import ClosedExpectation, ExpectationQuery
from sparse_evolve.utils.response import APIResponse, create_response

router = APIRouter()

@router.post("/closed", response_model=APIResponse[ClosedExpectation])
def closed_form(*, query: ExpectationQuery) -> Any:
    """
    Closed-form expected count with its grouped Theta-form table.
    """
    return create_response(expected_count_closed(query.extension, query.alpha, query.tau0, query.T))

@router.post("/oracle", response_model=APIResponse[float])
def oracle(*, query: ExpectationQuery) -> Any:
    """
    Exact finite-sum expectation.

    - **413** when the sum is over the configured work budget
    """
    return create_response(exact_expectation_oracle(query.extension, query.alpha, query.tau0, query.T))
