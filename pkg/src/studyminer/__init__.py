"""studyminer: mine experimental-design records out of scientific papers.

The pipeline stages are ingest (files and archives to plain text),
preprocess (clean, section, chunk), extract (backend-assisted six-field
records), eval (score predictions against gold annotations), and qa
(retrieval-backed document questions). The ``studyminer`` CLI and the
HTTP service in :mod:`studyminer.service` tie the stages together.
"""

__version__ = "0.1.0"
