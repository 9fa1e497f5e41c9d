"""Numerical toolkit for Arakelian sets: holes, logarithm branches and their obstructions."""

from .analysis import (AnalyticFn, ExpOf, LinearFactor, LogGrid, LogPath, Obstruction,
                       Polynomial, Product, WeierstrassProduct, evaluate, extend_log,
                       fn_from_dict, log_on_path, log_on_set, weierstrass_build,
                       winding_details, winding_many, winding_number)
from .errors import (ArakelianError, ConfigurationError, ConstructionError, DomainError,
                     NonconvergenceError, ResolutionError, SchemaError)
from .geometry import (Annulus, Circle, Disk, GridSet, HalfPlane, Polygon, Rectangle, Scene,
                       Segment, Window, closed_disk, dilate, distance_transform, rasterize)
from .scenes import corpus_names, corpus_scene, load_scene
from .topology import (ArakelianReport, ArcSet, PolyPath, RegionLabeling, circle_arcs,
                       components, enclosing_curve, filling, holes, is_arakelian)
from .witness import WitnessReport, glue_log_domains, witness_step1, witness_step2

__version__ = "0.1.0"
