from typing import Any
from fastapi import APIRouter
from sparse_evolve.engine.census import count_embeddings
from sparse_evolve.engine.evolve import EvolvingGraph
from sparse_evolve.schemas.census import CensusQuery, EmbeddingRecord
from sparse_evolve.utils.response import APIResponse, create_response

router = APIRouter()

@router.post("/count", response_model=APIResponse[EmbeddingRecord])
def count(*, query: CensusQuery) -> Any:
    """
    Count induced rooted embeddings of an extension in an inline graph.
    """
    graph = EvolvingGraph.from_file(query.graph)
    result = count_embeddings(graph, query.extension, query.roots, query.forbidden)
    return create_response(result.to_record())
