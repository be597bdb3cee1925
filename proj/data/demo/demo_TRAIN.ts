# Synthetic wrist-worn accelerometer gestures for demos and tests.
@problemName demo
@timeStamps false
@missing false
@univariate false
@dimensions 2
@equalLength true
@seriesLength 12
@classLabel true walk run jump
@data
0,0.3,0.52,0.6,0.52,0.3,0,-0.3,-0.52,-0.6,-0.52,-0.3:0.4,0.346,0.2,0,-0.2,-0.346,-0.4,-0.346,-0.2,0,0.2,0.346:walk
0.1,0.4,0.62,0.7,0.62,0.4,0.1,-0.2,-0.42,-0.5,-0.42,-0.2:0.34,0.286,0.14,-0.06,-0.26,-0.406,-0.46,-0.406,-0.26,-0.06,0.14,0.286:walk
-0.1,0.2,0.42,0.5,0.42,0.2,-0.1,-0.4,-0.62,-0.7,-0.62,-0.4:0.46,0.406,0.26,0.06,-0.14,-0.286,-0.34,-0.286,-0.14,0.06,0.26,0.406:walk
0,1.039,1.039,0,-1.039,-1.039,0,1.039,1.039,0,-1.039,-1.039:0.8,0.4,-0.4,-0.8,-0.4,0.4,0.8,0.4,-0.4,-0.8,-0.4,0.4:run
0.14,1.179,1.179,0.14,-0.899,-0.899,0.14,1.179,1.179,0.14,-0.899,-0.899:0.88,0.48,-0.32,-0.72,-0.32,0.48,0.88,0.48,-0.32,-0.72,-0.32,0.48:run
-0.14,0.899,0.899,-0.14,-1.179,-1.179,-0.14,0.899,0.899,-0.14,-1.179,-1.179:0.72,0.32,-0.48,-0.88,-0.48,0.32,0.72,0.32,-0.48,-0.88,-0.48,0.32:run
0.1,0.1,0.1,0.1,0.1,2.1,2.1,0.9,0.1,0.1,0.1,0.1:-0.1,-0.1,-0.1,-0.1,-0.1,-1.6,-1.6,-0.1,-0.1,-0.1,-0.1,-0.1:jump
0.14,0.14,0.14,0.14,0.14,2.14,2.14,0.94,0.14,0.14,0.14,0.14:-0.24,-0.04,-0.24,-0.04,-0.24,-1.54,-1.74,-0.04,-0.24,-0.04,-0.24,-0.04:jump
0.06,0.06,0.06,0.06,0.06,2.06,2.06,0.86,0.06,0.06,0.06,0.06:0.04,-0.16,0.04,-0.16,0.04,-1.66,-1.46,-0.16,0.04,-0.16,0.04,-0.16:jump
