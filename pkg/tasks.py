"""invoke tasks for local development.

Example:
    invoke task_name

    where task_name is one of test, acceptance, simulate, sweep, celery or
    print-default-scenario.

Requirement:
    invoke library

Attributes:
    MANAGE (str): prefix of every management command.
    SERVE_CELERY (str): command that serves a worker for the simulations queue.
    SWEEPS (tuple): names accepted by the sweep task.
"""
from invoke import run, task

MANAGE = "python manage.py"
SERVE_CELERY = "celery --app=project worker --loglevel=INFO -Q simulations"
SWEEPS = ("thresholds", "handover", "window", "beams")


@task
def test(c, label="", verbose=False):
    """Fast test suites; long acceptance runs are left out.

    Args:
        c (obj): Context-aware API wrapper & state-passing object.
        label (str): optional test label, e.g. solver or scenarios.tests.test_schema.
        verbose (bool): print each test as it runs.

    Usage:
        invoke test or invoke test --label solver
    """
    run(
        f"{MANAGE} test --exclude-tag slow {label} {'-v 2' if verbose else ''}".strip(),
        pty=True,
    )


@task
def acceptance(c):
    """Desk-scale acceptance runs with the full constellations. Takes a while.

    Usage:
        invoke acceptance
    """
    run(f"RUN_SLOW_TESTS=1 {MANAGE} test --tag slow -v 2", pty=True)


@task
def simulate(c, scenario="small_region", mode="", out="", overwrite=False):
    """Runs one scenario and writes its artefacts.

    Args:
        c (obj): Context-aware API wrapper & state-passing object.
        scenario (str): scenario file or preset name.
        mode (str): protected or baseline; the scenario's own mode when empty.
        out (str): output directory; SIMULATION_RESULTS_ROOT/<name>-<mode> when empty.
        overwrite (bool): replace the files of an existing output directory.

    Usage:
        invoke simulate --scenario starlink_kuiper_texas --mode baseline
    """
    command = f"{MANAGE} simulate --scenario {scenario}"
    if mode:
        command += f" --mode {mode}"
    if out:
        command += f" --out {out}"
    if overwrite:
        command += " --overwrite"
    run(command, pty=True)


@task
def sweep(c, name="thresholds", scenario="small_region", out="", overwrite=False):
    """Runs a parameter grid; points go to Celery workers unless tasks run eagerly.

    Usage:
        invoke sweep --name handover
    """
    if name not in SWEEPS:
        run(f"echo 'Unknown sweep {name}; choose from {', '.join(SWEEPS)}'")
        return
    command = f"{MANAGE} sweep {name} --scenario {scenario}"
    if out:
        command += f" --out {out}"
    if overwrite:
        command += " --overwrite"
    run(command, pty=True)


@task
def celery(c):
    """Serves a worker for sweep points. Set CELERY_TASK_ALWAYS_EAGER=0 on the dispatching side.

    Usage:
        invoke celery
    """
    run(SERVE_CELERY, pty=True)


@task
def print_default_scenario(c):
    """Prints every scenario key with its default value."""
    run(f"{MANAGE} simulate --print-default-scenario")
