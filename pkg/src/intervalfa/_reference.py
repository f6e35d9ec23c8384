"""Correlation matrices of the six reference block structures.

Each entry holds the strict upper triangle, row by row, of the center
(``"centers"``) and half-range (``"ranges"``) correlation matrices for
``p = 10`` variables.
"""

BLOCK_SIZES = {1: (10,), 2: (10,), 3: (3, 7), 4: (4, 6), 5: (3, 7), 6: (3, 4, 3)}

EXPECTED_FACTOR_COUNTS = {1: 1, 2: 1, 3: 2, 4: 2, 5: 2, 6: 3}


MATRICES = {
    1: {
        "centers": (
            (0.898, 0.914, 0.910, 0.915, 0.891, 0.890, 0.907, 0.909, 0.892),
            (0.893, 0.920, 0.907, 0.871, 0.907, 0.915, 0.902, 0.920),
            (0.907, 0.920, 0.912, 0.915, 0.919, 0.920, 0.903),
            (0.912, 0.899, 0.905, 0.872, 0.888, 0.931),
            (0.906, 0.917, 0.920, 0.938, 0.928),
            (0.926, 0.929, 0.931, 0.888),
            (0.912, 0.925, 0.922),
            (0.943, 0.915),
            (0.903,),
        ),
        "ranges": (
            (0.818, 0.888, 0.919, 0.862, 0.861, 0.883, 0.887, 0.911, 0.910),
            (0.852, 0.825, 0.837, 0.779, 0.856, 0.782, 0.830, 0.797),
            (0.910, 0.913, 0.824, 0.929, 0.901, 0.921, 0.884),
            (0.926, 0.853, 0.918, 0.878, 0.918, 0.902),
            (0.878, 0.996, 0.902, 0.910, 0.864),
            (0.887, 0.894, 0.881, 0.895),
            (0.872, 0.927, 0.887),
            (0.918, 0.897),
            (0.912,),
        ),
    },
    2: {
        "centers": (
            (0.661, 0.700, 0.611, 0.623, 0.693, 0.706, 0.773, 0.705, 0.709),
            (0.768, 0.686, 0.683, 0.695, 0.685, 0.726, 0.719, 0.723),
            (0.662, 0.667, 0.735, 0.697, 0.781, 0.667, 0.748),
            (0.726, 0.686, 0.760, 0.686, 0.677, 0.660),
            (0.688, 0.714, 0.652, 0.779, 0.724),
            (0.612, 0.763, 0.671, 0.715),
            (0.649, 0.703, 0.707),
            (0.723, 0.665),
            (0.629,),
        ),
        "ranges": (
            (0.760, 0.715, 0.767, 0.730, 0.564, 0.721, 0.464, 0.711, 0.798),
            (0.634, 0.691, 0.762, 0.644, 0.710, 0.546, 0.716, 0.708),
            (0.759, 0.695, 0.534, 0.694, 0.536, 0.768, 0.696),
            (0.735, 0.601, 0.711, 0.496, 0.757, 0.817),
            (0.683, 0.766, 0.677, 0.798, 0.710),
            (0.573, 0.458, 0.619, 0.617),
            (0.548, 0.686, 0.751),
            (0.573, 0.475),
            (0.727,),
        ),
    },
    3: {
        "centers": (
            (0.858, 0.891, 0.220, 0.203, 0.230, 0.170, 0.234, 0.228, 0.192),
            (0.893, 0.183, 0.216, 0.206, 0.210, 0.173, 0.213, 0.173),
            (0.134, 0.196, 0.193, 0.245, 0.223, 0.235, 0.159),
            (0.831, 0.805, 0.792, 0.806, 0.797, 0.808),
            (0.824, 0.813, 0.799, 0.793, 0.821),
            (0.796, 0.865, 0.792, 0.770),
            (0.818, 0.786, 0.812),
            (0.807, 0.808),
            (0.779,),
        ),
        "ranges": (
            (0.843, 0.829, 0.254, 0.238, 0.249, 0.233, 0.234, 0.281, 0.255),
            (0.877, 0.238, 0.212, 0.229, 0.248, 0.264, 0.272, 0.256),
            (0.267, 0.276, 0.260, 0.221, 0.260, 0.259, 0.260),
            (0.918, 0.857, 0.880, 0.926, 0.906, 0.900),
            (0.941, 0.918, 0.900, 0.904, 0.890),
            (0.896, 0.866, 0.919, 0.890),
            (0.866, 0.873, 0.885),
            (0.917, 0.906),
            (0.914,),
        ),
    },
    4: {
        "centers": (
            (0.541, 0.529, 0.551, 0.068, 0.102, 0.048, 0.097, 0.094, 0.118),
            (0.567, 0.570, 0.095, 0.093, 0.095, 0.127, 0.117, 0.129),
            (0.573, 0.142, 0.059, 0.099, 0.103, 0.145, 0.095),
            (0.059, 0.058, 0.098, 0.130, 0.108, 0.087),
            (0.624, 0.674, 0.625, 0.673, 0.636),
            (0.645, 0.649, 0.642, 0.634),
            (0.653, 0.606, 0.635),
            (0.594, 0.650),
            (0.640,),
        ),
        "ranges": (
            (0.566, 0.629, 0.577, 0.192, 0.192, 0.238, 0.222, 0.215, 0.205),
            (0.580, 0.594, 0.205, 0.224, 0.185, 0.232, 0.194, 0.217),
            (0.567, 0.215, 0.245, 0.189, 0.217, 0.231, 0.197),
            (0.199, 0.224, 0.158, 0.202, 0.215, 0.169),
            (0.631, 0.608, 0.648, 0.626, 0.648),
            (0.611, 0.622, 0.654, 0.623),
            (0.611, 0.619, 0.640),
            (0.618, 0.660),
            (0.662,),
        ),
    },
    5: {
        "centers": (
            (0.909, 0.956, 0.104, 0.122, 0.096, 0.121, 0.091, 0.141, 0.092),
            (0.913, 0.082, 0.130, 0.133, 0.108, 0.080, 0.076, 0.088),
            (0.111, 0.126, 0.097, 0.082, 0.078, 0.102, 0.134),
            (0.587, 0.564, 0.595, 0.563, 0.617, 0.560),
            (0.599, 0.562, 0.587, 0.613, 0.557),
            (0.552, 0.581, 0.564, 0.599),
            (0.618, 0.586, 0.549),
            (0.533, 0.569),
            (0.544,),
        ),
        "ranges": (
            (0.912, 0.931, 0.201, 0.173, 0.207, 0.224, 0.179, 0.231, 0.184),
            (0.938, 0.204, 0.195, 0.204, 0.181, 0.221, 0.230, 0.180),
            (0.218, 0.183, 0.194, 0.230, 0.189, 0.202, 0.236),
            (0.608, 0.617, 0.575, 0.597, 0.618, 0.613),
            (0.626, 0.610, 0.631, 0.587, 0.606),
            (0.602, 0.620, 0.601, 0.576),
            (0.607, 0.609, 0.641),
            (0.551, 0.620),
            (0.590,),
        ),
    },
    6: {
        "centers": (
            (0.901, 0.786, 0.048, 0.117, 0.044, 0.083, 0.133, 0.110, 0.104),
            (0.849, 0.089, 0.116, 0.086, 0.130, 0.149, 0.107, 0.117),
            (0.120, 0.080, 0.128, 0.126, 0.143, 0.077, 0.121),
            (0.889, 0.900, 0.910, 0.101, 0.085, 0.110),
            (0.900, 0.940, 0.131, 0.177, 0.114),
            (0.867, 0.067, 0.116, 0.066),
            (0.166, 0.076, 0.109),
            (0.881, 0.948),
            (0.929,),
        ),
        "ranges": (
            (0.941, 0.938, 0.191, 0.126, 0.161, 0.142, 0.185, 0.192, 0.159),
            (0.945, 0.174, 0.135, 0.163, 0.130, 0.168, 0.137, 0.166),
            (0.179, 0.155, 0.145, 0.143, 0.138, 0.159, 0.117),
            (0.846, 0.867, 0.828, 0.175, 0.135, 0.134),
            (0.845, 0.856, 0.177, 0.158, 0.108),
            (0.817, 0.168, 0.114, 0.125),
            (0.183, 0.208, 0.177),
            (0.799, 0.866),
            (0.785,),
        ),
    },
}
