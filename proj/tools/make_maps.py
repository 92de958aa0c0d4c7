#!/usr/bin/env python3
"""Regenerates the bundled house fixtures in maps/.

Each map is built from axis-aligned wall rectangles on a 0.1 m grid. Row 0 of
the emitted grid is the minimum-y row.
"""
import json
import math
import pathlib

RES = 0.1


class House:
    def __init__(self, width, height):
        self.cols = round(width / RES)
        self.rows = round(height / RES)
        self.cells = [[False] * self.cols for _ in range(self.rows)]
        self.doors, self.stairs, self.chairs = [], [], []

    def wall(self, x0, y0, x1, y1):
        for r in range(round(y0 / RES), round(y1 / RES)):
            for c in range(round(x0 / RES), round(x1 / RES)):
                self.cells[r][c] = True

    def clear(self, x0, y0, x1, y1):
        for r in range(round(y0 / RES), round(y1 / RES)):
            for c in range(round(x0 / RES), round(x1 / RES)):
                self.cells[r][c] = False

    def border(self, t=0.3):
        w, h = self.cols * RES, self.rows * RES
        self.wall(0, 0, w, t)
        self.wall(0, h - t, w, h)
        self.wall(0, 0, t, h)
        self.wall(w - t, 0, w, h)

    def document(self, path, start):
        return {
            "resolution": RES,
            "grid": ["".join("#" if v else "." for v in row) for row in self.cells],
            "doors": self.doors,
            "stairs": self.stairs,
            "chairs": self.chairs,
            "path": [[round(x, 4), round(y, 4)] for x, y in path],
            "start": start,
        }


def arc_points(cx, cy, radius, a0, a1, n):
    return [
        (cx + radius * math.cos(a0 + (a1 - a0) * i / n),
         cy + radius * math.sin(a0 + (a1 - a0) * i / n))
        for i in range(n + 1)
    ]


def straight(x0, y0, x1, y1, step=1.0):
    n = max(1, round(math.hypot(x1 - x0, y1 - y0) / step))
    return [(x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * i / n) for i in range(n + 1)]


def house_a():
    """L-shaped hallway: east along the bottom, then north. Stairs on the path."""
    h = House(24.0, 20.0)
    h.border()
    # Solid block filling the inside of the L leaves a 4 m wide hallway.
    h.wall(0.3, 6.0, 16.0, 19.7)
    # Room behind the hallway's outer wall, reached through two doorways.
    h.wall(20.0, 0.3, 20.3, 3.0)
    h.doors += [[20.15, 3.5], [10.0, 5.8]]
    h.stairs += [[8.0, 2.2], [18.5, 10.0]]
    h.chairs += [[22.5, 1.5], [21.5, 17.5]]
    path = straight(2.0, 3.0, 15.0, 3.0)
    path += arc_points(15.0, 6.0, 3.0, -math.pi / 2, 0.0, 6)[1:]
    path += straight(18.0, 6.0, 18.0, 18.0)[1:]
    return h.document(path, [2.0, 3.0, 0.0])


def house_b():
    """Open rooms: a winding path past staircases and chair clusters."""
    h = House(30.0, 20.0)
    h.border()
    h.wall(10.0, 9.0, 10.3, 19.7)
    h.wall(20.0, 0.3, 20.3, 11.0)
    h.doors += [[10.15, 8.5], [20.15, 11.5]]
    h.stairs += [[5.0, 2.0], [13.5, 7.5], [24.5, 15.5], [28.0, 8.0]]
    h.chairs += [[8.0, 6.5], [15.0, 4.0], [17.5, 13.5], [23.0, 17.8], [27.0, 12.0]]
    path = straight(2.0, 4.0, 12.0, 4.0)
    path += arc_points(12.0, 7.0, 3.0, -math.pi / 2, 0.0, 6)[1:]
    path += straight(15.0, 7.0, 15.0, 12.0)[1:]
    path += arc_points(18.0, 12.0, 3.0, math.pi, math.pi / 2, 6)[1:]
    path += straight(18.0, 15.0, 26.0, 15.0)[1:]
    path += arc_points(26.0, 12.0, 3.0, math.pi / 2, 0.0, 6)[1:]
    path += straight(29.0, 12.0, 29.0, 10.0)[1:]
    return h.document(path, [2.0, 4.0, 0.0])


def house_c():
    """Long corridor between two rows of rooms, doorways alternating sides."""
    h = House(32.0, 16.0)
    h.border()
    h.wall(0.3, 5.7, 31.7, 6.0)
    h.wall(0.3, 10.0, 31.7, 10.3)
    for x in (8.0, 20.0):
        h.clear(x - 0.5, 10.0, x + 0.5, 10.3)
        h.doors.append([x, 10.15])
    for x in (14.0, 26.0):
        h.clear(x - 0.5, 5.7, x + 0.5, 6.0)
        h.doors.append([x, 5.85])
    for x in (11.0, 23.0):
        h.wall(x, 10.3, x + 0.3, 15.7)
        h.wall(x + 3.0, 0.3, x + 3.3, 5.7)
    h.stairs += [[29.0, 13.0]]
    h.chairs += [[4.0, 3.0], [16.0, 13.0]]
    path = straight(2.0, 8.0, 30.0, 8.0)
    return h.document(path, [2.0, 8.0, 0.0])


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "maps"
    out.mkdir(exist_ok=True)
    for name, build in (("houseA", house_a), ("houseB", house_b), ("houseC", house_c)):
        doc = build()
        text = json.dumps(doc, indent=1)
        (out / f"{name}.json").write_text(text + "\n")
        print(f"{name}: {len(doc['grid'][0])}x{len(doc['grid'])}, path {len(doc['path'])} pts")


if __name__ == "__main__":
    main()
