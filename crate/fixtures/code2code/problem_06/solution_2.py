def peak(values):
    ordered = sorted(v.rating for v in values)
    return ordered[-1]
