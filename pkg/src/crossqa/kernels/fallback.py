"""Pure-Python (numpy) BM25 accumulation kernel."""

import numpy as np


def accumulate_scores(scores, doc_ids, tfs, norms, idf, k1):
    """Add one query term's contribution to the score accumulator.

    scores  -- float64[n_docs], mutated in place
    doc_ids -- int32 postings doc ids (unique within one term)
    tfs     -- int32 term frequencies aligned with doc_ids
    norms   -- float64[n_docs] precomputed k1*(1 - b + b*dl/avgdl)
    """
    tf = tfs.astype(np.float64)
    scores[doc_ids] += (idf * (tf * (k1 + 1.0))) / (tf + norms[doc_ids])
