"""Head-pose driven zoom/pan engine.

A stream of head poses (position + yaw/pitch/roll) is calibrated to a
per-user lean interval, smoothed with lean-scheduled scalar Kalman
filters and mapped by one of three interaction modes (static, parallel,
tilt) to a zoom/pan view over a virtual 2 m x 1 m image plane. The
package also ships trace/trial file formats, per-trial interaction
metrics, a repeated-measures comparison pipeline, a FastAPI streaming
service and a thin CLI.
"""

__version__ = "0.1.0"
