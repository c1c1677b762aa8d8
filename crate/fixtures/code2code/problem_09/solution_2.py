def peak(values):
    ordered = sorted(v.cost for v in values)
    return ordered[-1]
