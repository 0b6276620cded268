if True: import gevent
