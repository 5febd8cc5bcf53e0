try:
    from ._qcfilter import *  # noqa: F401,F403  (installed layout)
    from ._qcfilter import __doc__  # noqa: F401
except ImportError:
    from _qcfilter import *  # noqa: F401,F403  (build-tree layout)
    from _qcfilter import __doc__  # noqa: F401
