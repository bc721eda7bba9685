"""Reference first-passage kernel in numpy.

All walkers of a chunk advance in lock-step. At every step each still-active
walker, in ascending index order, consumes one double from the bit
generator and moves to the first state whose cumulative column probability
exceeds it. The compiled kernel follows the same order, so both produce
identical step counts for the same bit-generator state.
"""

import numpy as np


def run_chunk(cum_t, start, target, bit_generator, count_return, budget):
    gen = np.random.Generator(bit_generator)
    n = cum_t.shape[0]
    state = np.array(start, dtype=np.int64)
    steps = np.zeros(state.size, dtype=np.int64)
    if count_return:
        active = np.arange(state.size)
    else:
        active = np.flatnonzero(state != target)
    total = 0
    while active.size:
        u = gen.random(active.size)
        nxt = np.count_nonzero(cum_t[state[active]] <= u[:, None], axis=1)
        np.minimum(nxt, n - 1, out=nxt)
        state[active] = nxt
        steps[active] += 1
        total += active.size
        if total > budget:
            break
        active = active[nxt != target]
    return steps, total
