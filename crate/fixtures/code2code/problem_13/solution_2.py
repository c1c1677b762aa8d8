def peak(values):
    ordered = sorted(v.capacity for v in values)
    return ordered[-1]
