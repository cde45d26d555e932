import multiprocessing as mpr
import threading as thr
import time


class TicToc:
    """Nested wall-clock timer, printing only when `debug` is set.

    Timers are kept on a stack per process and thread, so that a simulation running
    trials on several threads produces correctly indented, non-interleaved timings.
    The last measured duration is available as :attr:`elapsed` whether or not anything
    was printed.
    """
    __t_start = {}

    def __init__(self, title="", debug=True):
        self.title = title
        self.should_print = debug
        self.elapsed = None

    def tic(self, _print=False):
        stack = TicToc.__t_start.setdefault(self.mp_name, [])
        if _print and self.should_print:
            print("%s%s::[%s]" % (self._get_indent_str(len(stack)), self.mp_name, self.title),
                  flush=True)
        stack.append(time.perf_counter())

    def toc(self):
        stack = TicToc.__t_start[self.mp_name]
        self.elapsed = time.perf_counter() - stack.pop()
        if self.should_print:
            print("%s%s::[%s] complete in %.3fs" % (
                self._get_indent_str(len(stack)), self.mp_name, self.title, self.elapsed),
                flush=True)
        return self.elapsed

    @property
    def mp_name(self):
        return "%s.%s" % (mpr.current_process().name, thr.current_thread().name)

    @staticmethod
    def _get_indent_str(level):
        return "--" * level

    def __enter__(self):
        self.tic(_print=True)
        return self

    def __exit__(self, type, value, traceback):
        self.toc()
