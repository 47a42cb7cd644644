"""Straight-line re-statement of the keystroke accounting loop.

Deliberately independent of aekit.engine: plain loops, plain list
indexing, strip() on raw surfaces.  Used as the ground-truth oracle for
randomized equivalence checks.
"""


def straight_line_alg1(surfaces, seq, topk_lists, design_label, k):
    """Returns (keys_auto, keys_manual, tokens_counted, hits)."""
    keys_auto = 0
    keys_manual = 0
    hits = 0
    for i in range(1, len(seq)):
        next_token = seq[i]
        next_text = surfaces[next_token].strip()
        top = topk_lists[i - 1]
        assert len(top) == k
        if next_token in top:
            hits += 1
            if design_label == "digit":
                keys_auto += 1
            else:
                keys_auto += top.index(next_token) + 1
        else:
            keys_auto += len(next_text)
        keys_manual += len(next_text)
    return keys_auto, keys_manual, len(seq) - 1, hits
