"""Static SVG renders: queue timelines and single-robot planned paths."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed salt and no date stamp keep SVG output byte-identical across runs
_RC = {"svg.hashsalt": "regret-team", "svg.fonttype": "path"}


def _to_svg(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def queue_timeline_svg(events) -> bytes:
    """One column per step; robots stacked in line order, position 1 at the bottom."""
    steps = [e for e in events if e.get("type") == "step"]
    if not steps:
        raise ValueError("event log has no step records")
    header = next((e for e in events if e.get("type") == "header"), {})
    n_robots = header.get("n_robots") or 1 + max(
        (rid for s in steps for rid in s["queue"]), default=0
    )
    longest = max((len(s["queue"]) for s in steps), default=0)
    cmap = plt.get_cmap("tab10" if n_robots <= 10 else "tab20")
    labels = len(steps) <= 60

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(min(4 + 0.15 * len(steps), 24), 3 + 0.3 * longest))
        for s in steps:
            for pos, rid in enumerate(s["queue"], start=1):
                served = rid in s["served"]
                ax.add_patch(
                    plt.Rectangle(
                        (s["step"] - 0.45, pos - 0.45),
                        0.9,
                        0.9,
                        facecolor=cmap(rid % cmap.N),
                        edgecolor="black" if served else "none",
                        linewidth=0.8,
                    )
                )
                if labels:
                    ax.text(s["step"], pos, str(rid), ha="center", va="center", fontsize=6)
        ax.set_xlim(steps[0]["step"] - 1, steps[-1]["step"] + 1)
        ax.set_ylim(0.4, max(longest, 1) + 0.6)
        ax.set_xlabel("time step")
        ax.set_ylabel("line position")
        title = header.get("scenario", "")
        model = header.get("model")
        ax.set_title(f"{title} ({model}) waiting line" if model else f"{title} waiting line")
        fig.tight_layout()
        return _to_svg(fig)


def path_svg(dump: dict) -> bytes:
    """Region map: expected local cost shading, visited cells, plan, objects."""
    rows, cols = dump["rows"], dump["cols"]
    local = np.asarray(dump["local_cost"], dtype=float).reshape(rows, cols)

    def rc(cell):
        return divmod(int(cell), cols)

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.5, 5.5))
        im = ax.imshow(local, cmap="gray", origin="upper")
        fig.colorbar(im, ax=ax, label="expected local cost")
        if dump["visited"]:
            mask = np.zeros((rows, cols))
            for cell in dump["visited"]:
                mask[rc(cell)] = 1
            overlay = np.zeros((rows, cols, 4))
            overlay[mask == 1] = (0.1, 0.7, 0.2, 0.55)
            ax.imshow(overlay, origin="upper")
        pts = ([rc(dump["current"])] if dump["current"] is not None else []) + [
            rc(c) for c in dump["path"]
        ]
        if pts:
            ys, xs = zip(*pts)
            ax.plot(xs, ys, "-", color="tab:blue", linewidth=1.2)
        if dump["current"] is not None:
            y, x = rc(dump["current"])
            ax.plot(x, y, "s", color="tab:red", markersize=9, label="current location")
        if dump["path"]:
            y, x = rc(dump["path"][-1])
            ax.plot(x, y, "^", color="tab:orange", markersize=9, label="horizon end")
        if dump["objects"]:
            ys, xs = zip(*(rc(c) for c in dump["objects"]))
            ax.plot(xs, ys, ".", color="tab:purple", markersize=6, label="objects")
        ax.set_title(f"robot {dump['robot']} plan at step {dump['step']} (h={dump['horizon']})")
        ax.legend(loc="upper left", bbox_to_anchor=(1.25, 1.0), fontsize=7)
        fig.tight_layout()
        return _to_svg(fig)
