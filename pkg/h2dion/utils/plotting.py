from typing import Dict, Sequence, Tuple

import plotly.graph_objs as go
from plotly import offline

Series = Tuple[Sequence[float], Sequence[float]]


def write_plot_html(path: str,
                    series: Dict[str, Series],
                    title: str,
                    x_title: str,
                    y_title: str) -> str:
    """
    Standalone HTML line plot of named (x, y) series.
    """
    plot_data = [go.Scatter(x=list(x), y=list(y), mode='lines', name=name) for name, (x, y) in series.items()]
    layout = go.Layout(
        title=title,
        xaxis=dict(title=x_title),
        yaxis=dict(title=y_title),
        height=600,
        width=900,
    )
    offline.plot(go.Figure(data=plot_data, layout=layout), filename=path, auto_open=False,
                 show_link=False, include_plotlyjs=True)
    return path


def write_heatmap_html(path: str,
                       x: Sequence[float],
                       y: Sequence[float],
                       z,
                       title: str,
                       x_title: str,
                       y_title: str) -> str:
    layout = go.Layout(
        title=title,
        xaxis=dict(title=x_title),
        yaxis=dict(title=y_title, scaleanchor='x'),
        height=800,
        width=800,
    )
    heatmap = go.Heatmap(x=list(x), y=list(y), z=[list(row) for row in z], colorscale='RdBu', zmid=0.0)
    offline.plot(go.Figure(data=[heatmap], layout=layout), filename=path, auto_open=False,
                 show_link=False, include_plotlyjs=True)
    return path
