"""Isovist measures along indoor trajectories, scored with Bayesian surprise."""

__version__ = "0.1.0"

from .errors import (DimensionMismatch, EmptyDataError, EmptyGridError, NoHitError, NoPathError,
                     OffGridError, ParamError, ParseError, ValidationError)
from .geometry import (FloorPlan, Point2, RayFan, RayHit, Segment, cast_fan, cast_ray,
                       contains_free_point, load_floor_plan, save_floor_plan)
from .isovist import (EdgeClass, IsovistMeasures, SimplePolygon, classify_edge, isovist_measures,
                      isovist_polygon, polygon_area)
from .navigation import (Explicit, LeftToRight, NavGrid, RandomGoals, Trajectory, find_path,
                         make_route, rasterize, resample_path)
from .peaks import PeakParams, detect_peaks
from .surprise import (FEATURES, BinningSpec, DirichletFeatureModel, DirichletParams,
                       SurpriseConfig, SurpriseSeries, assign_bin, categorical_kl,
                       compute_bin_edges, dirichlet_kl, posterior_update, surprise_series,
                       uniform_prior)
from .synthmaps import KINDS, SynthMapParams, generate_synthetic, room_layout
