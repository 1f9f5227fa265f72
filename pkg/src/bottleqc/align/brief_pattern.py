"""Constant BRIEF test pairs ``(x1, y1, x2, y2)`` relative to the keypoint.

Generated by ``bottleqc.align._pattern_gen`` (seed 0x0B0771E5); do not edit by hand.
"""

BRIEF_PAIRS = (
    (-5, 8, -5, -3),
    (5, -1, -6, 12),
    (-3, -4, 3, -5),
    (-1, -5, 12, 6),
    (-4, -5, -5, -2),
    (3, 4, -1, -3),
    (-8, 5, -4, 6),
    (-7, -6, -3, 0),
    (0, -1, -2, -7),
    (2, 4, 7, 9),
    (-1, 2, 10, -1),
    (14, 2, -3, 5),
    (-5, -10, 2, -5),
    (-13, 4, 0, -3),
    (-6, -1, 1, -6),
    (-2, -6, -3, -4),
    (6, -4, -2, 2),
    (-2, -15, 7, 4),
    (4, 15, -1, 11),
    (-4, -4, -5, 5),
    (15, 2, 5, -1),
    (11, 1, -2, -3),
    (8, 4, 7, -3),
    (-13, -3, 3, -4),
    (-3, -1, 2, -2),
    (8, -1, 7, -3),
    (8, 1, -6, 7),
    (1, 0, -5, 0),
    (1, 7, -6, 2),
    (-4, -15, 0, 2),
    (-5, 3, 0, -6),
    (6, -5, -7, 2),
    (-3, -2, -13, 2),
    (-2, -10, 2, 3),
    (2, 4, 15, -3),
    (2, 1, -6, -3),
    (6, 7, -12, 3),
    (15, -8, 1, -1),
    (-15, 0, -3, 6),
    (-4, 1, 6, 7),
    (4, -15, 3, 1),
    (12, 1, -7, 3),
    (-2, 5, -6, 10),
    (10, -11, 4, 3),
    (2, 5, -3, 2),
    (-13, 1, -8, -10),
    (-9, 0, 1, 9),
    (-3, -3, -2, -3),
    (-4, 1, 3, -8),
    (-8, -2, 9, 2),
    (-3, -4, 6, -7),
    (3, -1, -2, -4),
    (-3, 1, -4, 7),
    (-6, -2, 5, -5),
    (1, -4, -1, 2),
    (6, 8, 3, -15),
    (-2, -8, 4, -4),
    (14, -6, 1, 4),
    (-7, -1, 0, -4),
    (-3, -1, 1, 2),
    (0, -15, -5, 4),
    (8, 3, -7, -3),
    (-7, -5, -13, 12),
    (-2, -10, -4, 3),
    (15, -2, 6, 13),
    (-2, -8, -9, 3),
    (7, 9, 2, -5),
    (-3, 2, -6, -4),
    (8, 1, -8, 5),
    (-1, 2, -9, -2),
    (-9, 0, 8, -3),
    (-2, 3, -3, -4),
    (4, 7, -8, 3),
    (-1, -4, -6, -3),
    (-4, -1, -4, -7),
    (0, -6, -4, -3),
    (8, 1, -2, 0),
    (-14, -1, 3, -8),
    (-4, 7, 4, -1),
    (8, 6, -1, 3),
    (-8, 5, 1, -5),
    (-2, 0, -7, 0),
    (-1, 0, -6, 2),
    (12, -5, -3, -1),
    (12, 4, -6, 3),
    (-9, -9, -11, 1),
    (-1, -4, -4, -4),
    (-6, 5, 3, 7),
    (-3, 0, 1, -5),
    (9, 0, -13, 2),
    (-5, 9, -6, -10),
    (1, -1, 5, -1),
    (1, -6, -1, 2),
    (3, -6, -2, -6),
    (7, 7, 2, 9),
    (-2, 8, -1, -1),
    (9, -2, 4, 4),
    (9, 2, 3, -11),
    (-5, 13, -14, 3),
    (-2, 8, 5, 15),
    (-5, -6, 14, -1),
    (2, 6, 5, 7),
    (-11, 6, 10, -4),
    (4, -7, 0, 7),
    (-8, 4, 3, 10),
    (6, 0, 2, 4),
    (-4, -7, 2, -3),
    (6, -6, -5, 3),
    (0, 7, 5, 4),
    (4, -2, -1, -3),
    (1, 3, 1, -4),
    (1, -4, 2, -8),
    (15, -14, 8, 7),
    (1, -2, -6, 3),
    (11, -6, 3, -8),
    (-6, -11, -2, 1),
    (4, 15, 11, -7),
    (6, 2, 10, 6),
    (-3, -4, 7, -1),
    (2, 5, -5, -4),
    (4, 0, 2, 13),
    (2, 5, 1, 2),
    (-4, -12, 7, -4),
    (0, 1, 0, -5),
    (-5, -3, -2, -1),
    (6, 0, 12, 1),
    (-9, -2, -2, 0),
    (-4, -3, 6, 0),
    (-3, -2, 0, -5),
    (-3, 5, 2, 6),
    (5, -2, 7, -9),
    (-11, 2, -2, 10),
    (-8, 10, -8, 3),
    (11, 1, -1, 4),
    (4, 6, -5, -1),
    (2, -3, -10, 6),
    (1, 6, 12, 2),
    (-1, -1, 6, 8),
    (0, 4, -6, -4),
    (3, -3, 5, 3),
    (-8, 6, -1, -3),
    (-5, 2, 2, 0),
    (-15, -6, 2, 4),
    (7, -6, -8, 15),
    (-1, -3, 2, 0),
    (1, 7, -12, -5),
    (-8, 3, -3, -5),
    (9, -10, -10, 1),
    (5, -1, -2, -3),
    (2, 6, 1, 2),
    (-9, -1, 5, -5),
    (6, 3, 0, -12),
    (-3, -6, 10, -3),
    (-6, -3, -3, 7),
    (-5, 4, 7, 3),
    (-5, 3, -2, 5),
    (2, -3, -1, 13),
    (-10, 9, -2, -5),
    (5, 2, -7, -5),
    (1, 6, 1, -5),
    (-1, 3, 7, 9),
    (0, -6, -7, -6),
    (-2, -4, -2, -6),
    (-8, 6, -2, -9),
    (-8, 0, -6, 6),
    (1, -2, -8, 2),
    (-7, -6, 1, 1),
    (-8, -3, -5, -15),
    (-3, -1, 2, -5),
    (4, -4, 3, -4),
    (2, 3, 9, 1),
    (-11, -6, -3, -3),
    (0, 10, -15, 3),
    (-2, 10, 2, -11),
    (-9, 6, 7, -8),
    (-12, -3, 1, 5),
    (7, -1, 7, 4),
    (-5, -2, -8, 2),
    (7, -8, -8, 3),
    (12, -4, 9, -11),
    (3, 10, 9, -9),
    (-2, 0, -3, 1),
    (-1, -9, 1, 1),
    (8, 3, 7, -9),
    (-4, 1, -3, -1),
    (-6, 6, 9, 9),
    (1, 2, -7, 4),
    (-7, 3, 3, -15),
    (-4, -2, -1, 12),
    (0, 2, 1, -2),
    (2, 0, -9, -8),
    (1, 3, 6, -2),
    (-10, -10, -1, 2),
    (3, -5, 1, 6),
    (-8, 1, -1, -13),
    (-5, 7, 2, 8),
    (4, 13, -3, -3),
    (7, -5, -5, -12),
    (11, 1, 1, -8),
    (12, -1, -7, 8),
    (2, 0, -3, 4),
    (-3, -7, 10, -3),
    (-4, 6, 7, -1),
    (1, 2, 4, -3),
    (1, 2, 0, 9),
    (3, -1, 1, 6),
    (-5, -10, 3, 7),
    (-6, 2, -2, 5),
    (-12, 4, -3, -4),
    (7, 4, -12, -14),
    (-12, -6, -1, 9),
    (3, -8, -10, -11),
    (8, -7, 1, 10),
    (0, 0, 1, -3),
    (1, -13, 3, -4),
    (-4, -2, -7, 10),
    (2, -1, -5, 4),
    (-4, 0, 10, 2),
    (-2, 4, -10, -2),
    (3, -7, 10, 6),
    (-6, 2, 2, -1),
    (1, -9, 8, 5),
    (8, -3, 4, -3),
    (15, -6, 3, 15),
    (-5, -12, -8, -6),
    (1, -2, -4, 8),
    (0, 4, -1, 0),
    (6, -6, -6, -2),
    (4, 4, 2, -14),
    (-3, -4, -11, -15),
    (-6, 1, -2, -6),
    (-7, 0, 1, -2),
    (-9, 5, 6, 0),
    (5, 5, -3, -3),
    (-5, -5, -2, 4),
    (3, 0, -4, 14),
    (-3, -1, 4, 2),
    (4, -6, 2, -6),
    (5, -11, -1, 1),
    (1, -6, 2, 0),
    (1, 5, 9, -12),
    (-7, -2, -4, -10),
    (-5, 3, -15, 4),
    (-4, 0, -2, 7),
    (3, -1, 0, -5),
    (7, 7, 6, 2),
    (9, 0, -1, -1),
    (3, -7, -6, -2),
    (1, 5, -7, 3),
    (8, 3, 3, -2),
    (-7, 4, -1, 0),
    (2, -4, -6, 0),
    (4, 1, 0, -8),
    (14, 7, 1, -3),
    (-6, -12, 0, -4),
    (1, -2, -2, -3),
)

