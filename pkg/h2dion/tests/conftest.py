from importlib import import_module

import pytest


@pytest.fixture(autouse=True, scope='session')
def _load_management_commands():
    # Discover and import the management commands on the real filesystem, before any
    # pyfakefs Patcher hides the package directory from Django's command lookup.
    from django.core.management import get_commands
    for name, app in get_commands().items():
        if app == 'h2dion':
            import_module(f'h2dion.management.commands.{name}')
    # plotly reads its validator table from disk on first use and caches it.
    import plotly.graph_objs as go
    go.Figure(data=[go.Scatter()], layout=go.Layout(title='warm-up'))
