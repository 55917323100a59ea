from hypothesis import settings

from pooledsteps import _kernels

# kernel loading from the numba cache makes first calls slow
settings.register_profile("pooledsteps", deadline=None)
settings.load_profile("pooledsteps")
_kernels.warmup()

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
