import json
import sys

mode = sys.argv[1]
width = int(sys.argv[2])
kind = "continuous" if mode == "sum" else "probabilistic"

for line in sys.stdin:
    req = json.loads(line)
    op = req["op"]
    if op == "info":
        reply = {"kind": kind, "n_features": width, "n_classes": 2}
    elif mode == "fixed":
        reply = {"p": [[0.7, 0.3] for _ in req["x"]]}
    elif mode == "sum":
        reply = {"y": [sum(r) for r in req["x"]]}
    elif mode == "refuse":
        reply = {"error": "refusing to predict"}
    elif mode == "garbage":
        sys.stdout.write("this is not json\n")
        sys.stdout.flush()
        continue
    elif mode == "short":
        reply = {"p": [[0.7, 0.3]]}
    else:
        reply = {"p": [[1.5, -0.5] for _ in req["x"]]}
    sys.stdout.write(json.dumps(reply) + "\n")
    sys.stdout.flush()
