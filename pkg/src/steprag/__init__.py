"""steprag: desk-scale multi-step retrieval-augmented reasoning toolkit.

Subsystems: passage/QA ingestion (corpus), Okapi BM25 index (bm25), HTTP
model gateway with scripted/replay modes (gateway), the iterative
retrieve-reason step loop (engine), stepwise distillation record builder
(distill), difficulty-aware multi-task loss weighting (weighting), and QA
scoring (metrics). The `steprag` CLI wires them into a pipeline.
"""

__version__ = "0.1.0"
