import pylibmc
mc = pylibmc.Client(["127.0.0.1"])
