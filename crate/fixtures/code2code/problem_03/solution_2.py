def peak(values):
    ordered = sorted(v.length for v in values)
    return ordered[-1]
