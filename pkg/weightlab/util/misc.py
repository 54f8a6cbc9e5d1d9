"""
Misc helpers: smoothed timing meters for long sweeps and the check record
every verification returns.
"""
import time
import datetime
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


class SmoothedValue(object):
    """Track a series of values and provide access to smoothed values over a
    window or the global series average.
    """

    def __init__(self, window_size=20, fmt=None):
        if fmt is None:
            fmt = "{median:.4f} ({global_avg:.4f})"
        self.deque = deque(maxlen=window_size)
        self.total = 0.0
        self.count = 0
        self.fmt = fmt

    def update(self, value, n=1):
        self.deque.append(value)
        self.count += n
        self.total += value * n

    @property
    def median(self):
        return float(np.median(np.asarray(self.deque, dtype=np.float64)))

    @property
    def avg(self):
        return float(np.mean(np.asarray(self.deque, dtype=np.float64)))

    @property
    def global_avg(self):
        return self.total / max(self.count, 1)

    @property
    def max(self):
        return max(self.deque)

    @property
    def value(self):
        return self.deque[-1]

    def __str__(self):
        return self.fmt.format(
            median=self.median,
            avg=self.avg,
            global_avg=self.global_avg,
            max=self.max,
            value=self.value)


class MetricLogger(object):
    def __init__(self, delimiter="\t", verbose=True):
        self.meters = defaultdict(SmoothedValue)
        self.delimiter = delimiter
        self.verbose = verbose

    def update(self, **kwargs):
        for k, v in kwargs.items():
            assert isinstance(v, (float, int)), f'meter {k} got {type(v)}'
            self.meters[k].update(v)

    def __getattr__(self, attr):
        if attr in self.meters:
            return self.meters[attr]
        if attr in self.__dict__:
            return self.__dict__[attr]
        raise AttributeError("'{}' object has no attribute '{}'".format(
            type(self).__name__, attr))

    def __str__(self):
        meter_str = []
        for name, meter in self.meters.items():
            meter_str.append(
                "{}: {}".format(name, str(meter))
            )
        return self.delimiter.join(meter_str)

    def log_every(self, iterable, print_freq, header=None):
        i = 0
        if not header:
            header = ''
        start_time = time.time()
        end = time.time()
        iter_time = SmoothedValue(fmt='{avg:.4f}')
        space_fmt = ':' + str(len(str(len(iterable)))) + 'd'
        log_msg = self.delimiter.join([
            header,
            '[{0' + space_fmt + '}/{1}]',
            'eta: {eta}',
            '{meters}',
            'time: {time}',
        ])
        for obj in iterable:
            yield obj
            iter_time.update(time.time() - end)
            if self.verbose and (i % print_freq == 0 or i == len(iterable) - 1):
                eta_seconds = iter_time.global_avg * (len(iterable) - i)
                eta_string = str(datetime.timedelta(seconds=int(eta_seconds)))
                print(log_msg.format(
                    i, len(iterable), eta=eta_string,
                    meters=str(self),
                    time=str(iter_time)))
            i += 1
            end = time.time()
        total_time = time.time() - start_time
        total_time_str = str(datetime.timedelta(seconds=int(total_time)))
        if self.verbose:
            print('{} Total time: {} ({:.4f} s / it)'.format(
                header, total_time_str, total_time / max(len(iterable), 1)))


@dataclass
class CheckRecord:
    """One verified statement: what was checked, on which parameters, and the evidence."""
    name: str
    parameters: dict = field(default_factory=dict)
    passed: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'name': self.name,
            'parameters': jsonable(self.parameters),
            'passed': bool(self.passed),
            'details': jsonable(self.details),
        }

    def summary(self):
        status = 'PASS' if self.passed else 'FAIL'
        params = ' '.join(f'{k}={format_param(v)}' for k, v in sorted(self.parameters.items()))
        return f'[{status}] {self.name} {params}'.rstrip()


def all_passed(records):
    return all(r.passed for r in records)


def format_param(v):
    if isinstance(v, (tuple, list, frozenset, set)):
        items = sorted(v) if isinstance(v, (frozenset, set)) else v
        return ','.join(str(x) for x in items)
    return str(v)


def jsonable(obj):
    """Convert report payloads (tuples, frozensets, int-keyed dicts) into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def subsets(indices, nonempty=True):
    """All subsets of `indices` as sorted tuples, by size then lexicographically."""
    indices = tuple(sorted(indices))
    start = 1 if nonempty else 0
    out = []
    for k in range(start, len(indices) + 1):
        out.extend(combinations(indices, k))
    return out
