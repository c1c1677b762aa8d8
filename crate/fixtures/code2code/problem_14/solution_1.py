def bucket_flights(flights):
    buckets = defaultdict(list)
    for flight in flights:
        buckets[flight.color].append(flight)
    return dict(buckets)
