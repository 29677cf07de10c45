# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exploration core: the same BFS as pure.py with C-level state
encoding, projection and successor handling.  Results are bit-identical to
the pure engine (enforced by the parity tests)."""

from collections import deque

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

from .pure import RunResult


cdef class _Proj:
    """Projection positions for one event/predicate, with a scratch buffer."""
    cdef int* pos
    cdef int k
    cdef char* scratch

    def __cinit__(self, positions):
        self.k = len(positions)
        self.pos = <int*> malloc(self.k * sizeof(int) if self.k else 1)
        self.scratch = <char*> malloc(self.k * 4 if self.k else 1)
        cdef int i
        for i in range(self.k):
            self.pos[i] = positions[i]

    def __dealloc__(self):
        if self.pos != NULL:
            free(self.pos)
        if self.scratch != NULL:
            free(self.scratch)

    cdef bytes key(self, const char* src):
        cdef int i
        for i in range(self.k):
            memcpy(self.scratch + 4 * i, src + 4 * self.pos[i], 4)
        return PyBytes_FromStringAndSize(self.scratch, self.k * 4)

    def key_bytes(self, bytes data):
        return self.key(PyBytes_AS_STRING(data))


cdef class _Runner:
    cdef object low, opts, res, queue, goal
    cdef list states, inv_list, mon_list, events, event_projs, event_memos, inv_projs, mon_projs
    cdef dict index
    cdef object depth, pred_state, pred_event, pred_binding, fis_violations, deadlocks
    cdef object t_src, t_event, t_binding, t_dst
    cdef object goal_proj
    cdef bint record_transitions, check_invariants, stop_on_violation, stop_on_monitor, stop
    cdef long max_states, max_depth, n_transitions
    cdef int width, nbytes
    cdef char* buf

    def __cinit__(self, low, opts):
        self.buf = NULL

    def __dealloc__(self):
        if self.buf != NULL:
            free(self.buf)

    def __init__(self, low, opts):
        self.low = low
        self.opts = opts
        self.width = low.n
        self.nbytes = self.width * 4
        self.buf = <char*> malloc(self.nbytes if self.nbytes else 1)
        if self.buf == NULL:
            raise MemoryError()
        res = RunResult()
        self.res = res
        self.states = res.states
        self.index = res.index
        self.depth = res.depth
        self.pred_state = res.pred_state
        self.pred_event = res.pred_event
        self.pred_binding = res.pred_binding
        self.t_src = res.t_src
        self.t_event = res.t_event
        self.t_binding = res.t_binding
        self.t_dst = res.t_dst
        self.fis_violations = res.fis_violations
        self.deadlocks = res.deadlocks
        self.inv_list = list(low.invariants)
        self.mon_list = list(opts.monitors)
        self.events = list(low.events)
        self.event_projs = [_Proj(ev.read_pos) for ev in self.events]
        self.event_memos = [ev.memo for ev in self.events]
        self.inv_projs = [_Proj(inv.read_pos) for inv in self.inv_list]
        self.mon_projs = [_Proj(mon.read_pos) for mon in self.mon_list]
        self.goal = opts.goal
        self.goal_proj = _Proj(opts.goal.read_pos) if opts.goal is not None else None
        self.record_transitions = opts.record_transitions
        self.check_invariants = opts.check_invariants
        self.stop_on_violation = opts.stop_on_violation
        self.stop_on_monitor = opts.stop_on_monitor_violation
        self.max_states = opts.max_states
        self.max_depth = opts.max_depth
        self.stop = False
        self.n_transitions = 0
        self.queue = deque()

    cdef long discover(self, bytes data, long pred, long event_idx, long binding_id, long dd):
        cdef long new_idx = len(self.states)
        cdef const char* p = PyBytes_AS_STRING(data)
        cdef int i
        self.index[data] = new_idx
        self.states.append(data)
        self.depth.append(dd)
        self.pred_state.append(pred)
        self.pred_event.append(event_idx)
        self.pred_binding.append(binding_id)
        if self.check_invariants and self.res.invariant_violation is None:
            bad = []
            for i in range(len(self.inv_list)):
                inv = self.inv_list[i]
                verdict = inv.check_key((<_Proj> self.inv_projs[i]).key(p))
                if verdict is not True:
                    bad.append((inv.label, None if verdict is False else str(verdict)))
            if bad:
                self.res.invariant_violation = (new_idx, tuple(bad))
                if self.stop_on_violation:
                    self.stop = True
        for i in range(len(self.mon_list)):
            mon = self.mon_list[i]
            verdict = mon.check_key((<_Proj> self.mon_projs[i]).key(p))
            if verdict is not True:
                label = mon.label if verdict is False else f"{mon.label} [wd: {verdict}]"
                self.res.monitor_violations.append((new_idx, label))
                if self.stop_on_monitor:
                    self.stop = True
        if self.goal is not None and self.res.goal_state < 0:
            if self.goal.check_key((<_Proj> self.goal_proj).key(p)) is True:
                self.res.goal_state = new_idx
                self.stop = True
        return new_idx

    def execute(self):
        cdef long idx, j, d, outgoing, binding_id
        cdef int ev_i, n_events, pos, vid
        cdef const char* src
        cdef bytes state, succ_b, proj_key
        cdef dict memo
        cdef dict index = self.index
        res = self.res
        queue = self.queue
        states = self.states
        depth = self.depth
        n_events = len(self.events)

        for data in self.low.initial_encoded():
            if data not in index:
                self.discover(data, -1, -1, -1, 0)
                queue.append(index[data])
                if self.stop:
                    res.truncated = True
                    res.truncation_reason = "stopped early"
                    res.n_transitions = self.n_transitions
                    return res

        while queue:
            idx = queue.popleft()
            state = states[idx]
            d = depth[idx]
            if 0 <= self.max_depth <= d:
                res.truncated = True
                res.truncation_reason = "max_depth"
                continue
            src = PyBytes_AS_STRING(state)
            outgoing = 0
            for ev_i in range(n_events):
                proj_key = (<_Proj> self.event_projs[ev_i]).key(src)
                memo = <dict> self.event_memos[ev_i]
                hit = memo.get(proj_key)
                if hit is None:
                    hit = self.events[ev_i].compute(proj_key)
                    # compute() may re-enter Python; refresh the source
                    # pointer in case the bytes object moved (it cannot, but
                    # keep the pattern obvious for future edits)
                    src = PyBytes_AS_STRING(state)
                for entry in <tuple> hit:
                    binding_id = <long> (<tuple> entry)[0]
                    deltas = (<tuple> entry)[1]
                    if len(<tuple> deltas) == 0:
                        self.fis_violations.append((idx, ev_i, binding_id))
                        continue
                    outgoing += len(<tuple> deltas)
                    for delta in <tuple> deltas:
                        memcpy(self.buf, src, self.nbytes)
                        for pos_vid in <tuple> delta:
                            pos = <int> (<tuple> pos_vid)[0]
                            vid = <int> (<tuple> pos_vid)[1]
                            (<unsigned int*> self.buf)[pos] = <unsigned int> vid
                        succ_b = PyBytes_FromStringAndSize(self.buf, self.nbytes)
                        hit_j = index.get(succ_b)
                        if hit_j is None:
                            if len(states) >= self.max_states:
                                res.truncated = True
                                res.truncation_reason = "max_states"
                                continue
                            j = self.discover(succ_b, idx, ev_i, binding_id, d + 1)
                            queue.append(j)
                        else:
                            j = <long> hit_j
                        self.n_transitions += 1
                        if self.record_transitions:
                            self.t_src.append(idx)
                            self.t_event.append(ev_i)
                            self.t_binding.append(binding_id)
                            self.t_dst.append(j)
                        if self.stop:
                            res.truncated = True
                            res.truncation_reason = "stopped early"
                            res.n_transitions = self.n_transitions
                            return res
            if outgoing == 0:
                self.deadlocks.append(idx)
        res.n_transitions = self.n_transitions
        return res


def run(low, opts):
    return _Runner(low, opts).execute()
