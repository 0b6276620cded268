with open('f') as fh:
    import csv
