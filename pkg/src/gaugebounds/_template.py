"""Fixed 16x16 grayscale template for the raster-rotation embedding.

A seeded uniform random grid smoothed by one 3x3 box-blur pass, shipped as
literal data so the embedding has no external data dependency.  The values
themselves are arbitrary; only their fixed, mildly smooth geometry matters.
"""

import numpy as np

TEMPLATE_16 = np.array([
    [0.687905, 0.653888, 0.657539, 0.757076, 0.825958, 0.648971, 0.627083, 0.608976, 0.714734, 0.671169, 0.575530, 0.535686, 0.505129, 0.500017, 0.522102, 0.443456],
    [0.456395, 0.528751, 0.626275, 0.768865, 0.734884, 0.634116, 0.619259, 0.636691, 0.635605, 0.503992, 0.500264, 0.490144, 0.561957, 0.501788, 0.459224, 0.304272],
    [0.291680, 0.445827, 0.514792, 0.723420, 0.624095, 0.659915, 0.609311, 0.597160, 0.570040, 0.424064, 0.496599, 0.498560, 0.659309, 0.560779, 0.443749, 0.267530],
    [0.375151, 0.428960, 0.435424, 0.503605, 0.464339, 0.536679, 0.536172, 0.603534, 0.608696, 0.530027, 0.499012, 0.502861, 0.657308, 0.568879, 0.504637, 0.402916],
    [0.572548, 0.551738, 0.462931, 0.446920, 0.480739, 0.467751, 0.415295, 0.374554, 0.536348, 0.530392, 0.458904, 0.405735, 0.581226, 0.580354, 0.562429, 0.498906],
    [0.602023, 0.483136, 0.416731, 0.391926, 0.476449, 0.430189, 0.369889, 0.413742, 0.533782, 0.530453, 0.360974, 0.255677, 0.379637, 0.449313, 0.571973, 0.593505],
    [0.458228, 0.448961, 0.439648, 0.530435, 0.551077, 0.537667, 0.451398, 0.483348, 0.539609, 0.447319, 0.361549, 0.296416, 0.476744, 0.456480, 0.591471, 0.617003],
    [0.390843, 0.398995, 0.452309, 0.565920, 0.599755, 0.638629, 0.569154, 0.586694, 0.531165, 0.518373, 0.434087, 0.408337, 0.416102, 0.404780, 0.544565, 0.657179],
    [0.366902, 0.441546, 0.487639, 0.538535, 0.568298, 0.552938, 0.528213, 0.504411, 0.552614, 0.607843, 0.551003, 0.532972, 0.478125, 0.456781, 0.500045, 0.574194],
    [0.552647, 0.476369, 0.496207, 0.521634, 0.556552, 0.550172, 0.506930, 0.488929, 0.426603, 0.537071, 0.440490, 0.490297, 0.366857, 0.455128, 0.460839, 0.581361],
    [0.477633, 0.359980, 0.322385, 0.410929, 0.453229, 0.457441, 0.457971, 0.474946, 0.422869, 0.472479, 0.470017, 0.532944, 0.433616, 0.410616, 0.422034, 0.523517],
    [0.385945, 0.357076, 0.383950, 0.496365, 0.412241, 0.431930, 0.458448, 0.538918, 0.407101, 0.397236, 0.380474, 0.478574, 0.388229, 0.420114, 0.444695, 0.561777],
    [0.411317, 0.406956, 0.453286, 0.521715, 0.434166, 0.384889, 0.422176, 0.463423, 0.464376, 0.405912, 0.496607, 0.504653, 0.476785, 0.428316, 0.481741, 0.571618],
    [0.401351, 0.493515, 0.506399, 0.519449, 0.353974, 0.321529, 0.413439, 0.505627, 0.611625, 0.547165, 0.529584, 0.518981, 0.554717, 0.649844, 0.680223, 0.738063],
    [0.510212, 0.576756, 0.570031, 0.499063, 0.335222, 0.257959, 0.332043, 0.417133, 0.559027, 0.542772, 0.513191, 0.462801, 0.499820, 0.609690, 0.716142, 0.804974],
    [0.430790, 0.616093, 0.615215, 0.492514, 0.234969, 0.164197, 0.254797, 0.429876, 0.570851, 0.661831, 0.485401, 0.381742, 0.299756, 0.490025, 0.648072, 0.769199],
], dtype=np.float64)
TEMPLATE_16.setflags(write=False)
