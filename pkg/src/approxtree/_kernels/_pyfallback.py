"""Pure-numpy quantized inference, used when the extension is missing.

Routes all samples level-synchronously: each pass advances every sample
still at an internal node by one edge, so the loop runs depth times
regardless of sample count.
"""

import numpy as np


def predict_batch(codes, feature, shift, thr, left, right, label, root):
    n_samples = codes.shape[0]
    cur = np.full(n_samples, root, dtype=np.int32)
    active = np.nonzero(left[cur] >= 0)[0]
    while active.size:
        nodes = cur[active]
        value = codes[active, feature[nodes]] >> shift[nodes].astype(np.uint32)
        go_left = value <= thr[nodes]
        cur[active] = np.where(go_left, left[nodes], right[nodes])
        active = active[left[cur[active]] >= 0]
    return label[cur]
