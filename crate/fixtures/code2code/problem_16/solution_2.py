def peak(values):
    ordered = sorted(v.height for v in values)
    return ordered[-1]
