import importlib
m = importlib.import_module('dynamic')
