"""Rebuilds data/cache/openml/* from the copies of iris, wine and wdbc that ship
with scikit-learn, laid out the way the client caches OpenML downloads."""
import hashlib, json, os, sys
from sklearn.datasets import load_iris, load_wine, load_breast_cancer

root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "cache", "openml")

def fmt(v):
    return repr(round(float(v), 6))

def put(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    with open(path + ".sha256", "w") as f:
        f.write(hashlib.sha256(data).hexdigest() + "\n")

def emit(did, name, relation, features, X, labels, classes, class_name, class_first):
    lines = [f"@relation {relation}", ""]
    attrs = [f"@attribute '{f}' numeric" for f in features]
    cls = f"@attribute '{class_name}' {{{','.join(classes)}}}"
    lines += ([cls] + attrs) if class_first else (attrs + [cls])
    lines += ["", "@data"]
    for row, y in zip(X, labels):
        vals = [fmt(v) for v in row]
        lines.append(",".join([y] + vals if class_first else vals + [y]))
    put(os.path.join(root, str(did), "dataset.arff"), ("\n".join(lines) + "\n").encode())
    desc = {"data_set_description": {
        "id": str(did), "name": name, "version": "1", "format": "ARFF",
        "url": f"https://api.openml.org/data/v1/download/{did}/{name}.arff",
        "default_target_attribute": class_name,
    }}
    put(os.path.join(root, str(did), "description.json"), json.dumps(desc, indent=1).encode())

iris = load_iris()
emit(61, "iris", "iris", ["sepallength", "sepalwidth", "petallength", "petalwidth"], iris.data,
     ["Iris-" + iris.target_names[t] for t in iris.target], ["Iris-" + n for n in iris.target_names], "class", False)
wine = load_wine()
emit(187, "wine", "wine", [f.replace("/", "_") for f in wine.feature_names], wine.data,
     [str(t + 1) for t in wine.target], ["1", "2", "3"], "class", True)
bc = load_breast_cancer()
# OpenML codes benign as 1 and malignant as 2; scikit-learn uses 1 for benign.
emit(1510, "wdbc", "wdbc", [f"V{i + 1}" for i in range(30)], bc.data,
     ["1" if t == 1 else "2" for t in bc.target], ["1", "2"], "Class", False)
